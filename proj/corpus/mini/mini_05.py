import pandas as pd
from sklearn.ensemble import RandomForestClassifier

passengers = pd.read_csv('titanic.csv')
passengers.pop('Name')
del passengers['PassengerId']
y = passengers['Survived']
X = passengers.drop(['Survived'], axis=1)
clf = RandomForestClassifier(n_estimators=300)
clf.fit(X, y)
