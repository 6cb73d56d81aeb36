"""
influence_lab - I-score screening, partition-retention features and small neural baselines
"""

__version__ = "1.0.0"
