"""
Classical baselines: linear MMSE and depth-first sphere decoding.
"""

from .mmse import MmseConfig, mmse_detect
from .sphere import babai_point, sphere_decode

__all__ = ['MmseConfig', 'mmse_detect', 'babai_point', 'sphere_decode']
