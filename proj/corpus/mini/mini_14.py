import pandas as pd
from sklearn.preprocessing import StandardScaler
from sklearn.cluster import KMeans

metrics = pd.read_csv('server_metrics.csv')
X_raw = metrics[['cpu_pct', 'mem_pct', 'io_wait']]
scaler = StandardScaler()
X = scaler.fit_transform(X_raw)
km = KMeans(n_clusters=4)
km.fit(X)
