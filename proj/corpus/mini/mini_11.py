import pandas as pd
from sklearn.tree import DecisionTreeClassifier

digits = pd.read_csv('digits.csv')
X = digits.iloc[:, 2:8]
y = digits['label']
clf = DecisionTreeClassifier(max_depth=12)
clf.fit(X, y)
