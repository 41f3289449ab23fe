"""Shipped JSON data: chart presentations, blow-up centers, big-cell
stratum ideals and the covering group elements."""
