import pandas as pd
from sklearn.ensemble import GradientBoostingRegressor

raw = pd.read_csv('flights.csv')
clean = raw.dropna()
clean = clean.reset_index()
clean = clean.fillna(0)
y = clean['delay_minutes']
X = clean.drop(['delay_minutes', 'flight_id', 'tail_number'], axis=1)
gbr = GradientBoostingRegressor()
gbr.fit(X, y)
