"""Depth, dimension and Cohen-Macaulay defect of graded modules over polynomial rings."""
