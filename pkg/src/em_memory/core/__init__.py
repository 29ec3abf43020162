"""
Module core pour em-memory
Contient les calculs (sphère, trains, mémoire, détecteur, BNS) et les entrées/sorties
"""
