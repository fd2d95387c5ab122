import pandas as pd
from catboost import CatBoostClassifier
from sklearn.model_selection import train_test_split

data = pd.read_csv('churn.csv')
y = data['churned']
X = data.drop(['churned', 'customer_id'], axis=1)
train_x, test_x, train_y, test_y = train_test_split(X, y, test_size=0.3)
model = CatBoostClassifier(iterations=50)
model.fit(train_x, train_y)
