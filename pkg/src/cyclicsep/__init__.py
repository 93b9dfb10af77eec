"""Cyclic subgroup separability in free products with commuting subgroups."""
