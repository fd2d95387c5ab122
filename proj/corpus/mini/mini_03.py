import pandas as pd
import xgboost as xgb

housing = pd.read_csv('housing.csv')
y = housing['price']
X = housing.drop(['price'], axis=1)
params = {'max_depth': 6, 'eta': 0.1}
dtrain = xgb.DMatrix(X, label=y)
booster = xgb.train(params, dtrain, 20)
