import pandas as pd
import matplotlib.pyplot as plt

visits = pd.read_csv('site_visits.csv')
summary = visits.describe()
print(summary)
daily = visits.groupby('day').size()
plt.plot(daily)
plt.show()
