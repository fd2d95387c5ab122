import pandas as pd
from sklearn.linear_model import LogisticRegression

df = pd.read_csv('wine_quality.csv')
X = df.values[:, 1:]
y = df.values[:, 0]
clf = LogisticRegression()
clf.fit(X, y)
