# Root-cause model for recurring job slowdowns, trained on platform
# telemetry exported by the log pipeline.
import pandas as pd
from sklearn.ensemble import GradientBoostingClassifier
from sklearn.model_selection import train_test_split

telemetry = pd.read_csv('cluster_job_telemetry.csv')
telemetry = telemetry.fillna(0)

labels = telemetry['SlowdownCause']
features = telemetry[['VertexCount', 'AvgTaskRuntimeMs', 'InputSizeGb', 'RetryCount', 'QueueWaitMs']]

train_x, valid_x, train_y, valid_y = train_test_split(features, labels, test_size=0.25)
model = GradientBoostingClassifier(n_estimators=150)
model.fit(train_x, train_y)
