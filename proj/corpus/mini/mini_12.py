import pandas as pd
from sklearn.linear_model import Ridge

concrete = pd.read_csv('concrete.csv')
data = concrete.values
X = data[:, :-1]
y = data[:, -1]
model = Ridge(alpha=0.5)
model.fit(X, y)
