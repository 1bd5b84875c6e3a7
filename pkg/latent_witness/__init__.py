"""latent_witness

Bell-Type Nonclassicality Tests for Latent Representations

"""

__version__ = "v0.1.0"
