import pandas as pd
from sklearn.cluster import KMeans

points = pd.read_csv('gps_points.csv')
km = KMeans(n_clusters=8)
km.fit(points)
