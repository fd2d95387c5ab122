import pandas as p
import lightgbm as lgb

frame = p.read_csv('clicks.csv')
target = frame['clicked']
cols = frame.drop(['clicked', 'session_id'], axis=1)
dataset = lgb.Dataset(cols, label=target)
params = {'objective': 'binary', 'learning_rate': 0.05}
booster = lgb.train(params, dataset, 100)
