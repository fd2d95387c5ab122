import pandas as pd
from sklearn.preprocessing import StandardScaler

raw = pd.read_csv('sensor_readings.csv')
raw = raw.fillna(0)
scaler = StandardScaler()
scaled = scaler.fit_transform(raw)
pd.DataFrame(scaled).to_csv('sensor_scaled.csv')
