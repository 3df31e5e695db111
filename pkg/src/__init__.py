"""
hatsdetect: heuristic tree search for MIMO maximum-likelihood detection.
"""
