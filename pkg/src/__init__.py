"""rydring - excitation dynamics of Rydberg superatoms on a ring lattice"""
__version__ = "0.1.0"
