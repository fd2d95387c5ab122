import pandas as pd
from sklearn.linear_model import LinearRegression

q1 = pd.read_csv('sales_q1.csv')
q2 = pd.read_csv('sales_q2.csv')
sales = pd.concat([q1, q2])
y = sales['revenue']
X = sales.drop(['revenue'], axis=1)
model = LinearRegression()
model.fit(X, y)
