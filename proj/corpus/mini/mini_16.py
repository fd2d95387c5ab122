import pandas as pd
from sklearn.linear_model import LogisticRegression

X = pd.read_csv('features_matrix.csv')
y = pd.read_csv('labels_vector.csv')
clf = LogisticRegression(max_iter=500)
clf.fit(X, y)
