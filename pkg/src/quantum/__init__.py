"""Dense quantum primitives: matrices, circuits, Schur-Weyl combinatorics, measure-and-operate simulation"""
