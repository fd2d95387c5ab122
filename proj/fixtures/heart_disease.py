import pandas as pd
from catboost import CatBoostClassifier
from sklearn.model_selection import train_test_split
train_df = pd.read_csv('heart_disease.csv')
train_df = train_df.values[:, 3:]
train_y = train_df['Target']
train_x = train_df.drop(['Target', 'SSN'], axis=1)
train_x2, test_x2, train_y2, test_y2 = train_test_split(train_x, train_y, test_size=0.2)
clf = CatBoostClassifier(iterations=20, eval_metrics=['Accuracy'])
clf.fit(train_x2, train_y2, eval_set=(test_x2, test_y2))
