"""Finite algebras, quasivarieties and admissible rules."""
