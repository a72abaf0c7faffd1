"""Geodesics, distance and heat kernel of the Grušin operator."""
