# Domain modules: corpus, segmentation, features, classifiers, evaluation
