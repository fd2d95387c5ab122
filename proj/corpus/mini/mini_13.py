import pandas as pd
from catboost import CatBoostRegressor

autos = pd.read_csv('autos.csv')
autos = autos.dropna()
y = autos['price_eur']
X = autos.drop(columns=['price_eur', 'listing_id'])
X = X.astype('float32')
reg = CatBoostRegressor(iterations=200)
reg.fit(X, y)
