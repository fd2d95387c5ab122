import pandas
import sklearn.model_selection
import sklearn.svm

iris = pandas.read_csv('iris.csv')
y = iris['species']
X = iris.drop(['species'], axis=1)
a, b, c, d = sklearn.model_selection.train_test_split(X, y, test_size=0.5)
clf = sklearn.svm.SVC()
clf.fit(a, c)
