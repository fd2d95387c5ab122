import pandas as pd
from xgboost import XGBRegressor
from sklearn.model_selection import train_test_split

energy = pd.read_csv('energy_load.csv')
y = energy['load_mw']
X = energy.drop(['load_mw'], axis=1)
tr_x, va_x, tr_y, va_y = train_test_split(X, y, test_size=0.2)
reg = XGBRegressor(n_estimators=400)
reg.fit(tr_x, tr_y, eval_set=[(va_x, va_y)], early_stopping_rounds=25)
