"""UNRAVEL: rule-list explanations for a recurrent clinical-text classifier.

The package generates a synthetic sepsis-note corpus, trains an LSTM
classifier from scratch, scores word importance from input gradients,
aggregates scores into discretized skipgram features, and induces a
decision list that mimics the model's predictions.
"""

__version__ = "0.1.0"
