"""Unit test package for blinfty."""
