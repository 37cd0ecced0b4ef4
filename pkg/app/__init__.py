# sweak: s-weak order, congruences and polyhedral quotients
__version__ = "0.1.0"
