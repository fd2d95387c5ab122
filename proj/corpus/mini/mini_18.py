import numpy as np
from sklearn.linear_model import LogisticRegression

X = np.array([[0.1, 1.2], [0.7, 0.3], [1.5, 2.2], [2.0, 0.8]])
y = np.array([0, 0, 1, 1])
clf = LogisticRegression()
clf.fit(X, y)
