import pandas as pd
import lightgbm as lgb

trips = pd.read_csv('taxi_trips.csv')
feature_cols = ['distance_km', 'pickup_hour', 'passenger_count']
X = trips[feature_cols]
y = trips['tip_given']
clf = lgb.LGBMClassifier(n_estimators=80)
clf.fit(X, y)
