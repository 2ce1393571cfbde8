"""Services for encoding, training and evaluation.

matplotlib is imported lazily in plotting; keep it out of eager imports here.
"""
