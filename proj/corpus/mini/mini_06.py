import pandas as pd
from sklearn.ensemble import RandomForestClassifier
from sklearn.linear_model import LogisticRegression

loans = pd.read_csv('loans.csv')
y = loans['default']
X = loans.drop(['default'], axis=1)
rf = RandomForestClassifier()
rf.fit(X, y)
logit = LogisticRegression()
logit.fit(X, y)
