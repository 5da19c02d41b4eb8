"""Physical constants shared across the chain."""

SPEED_OF_LIGHT_M_S = 299_792_458.0
