"""Physical constants used across the simulator (SI units)."""

C_LIGHT = 299_792_458.0          # vacuum speed of light, m/s
EARTH_RADIUS = 6_371_000.0       # mean Earth radius, m
MU_EARTH = 3.986_004_418e14      # Earth gravitational parameter, m^3/s^2

# Inter-satellite rays must clear the bulk of the atmosphere.
ATMOSPHERE_CLEARANCE = 100_000.0  # m above the Earth surface

# Effective scale height for the low-elevation spherical-shell airmass.
AIRMASS_SCALE_HEIGHT = 8_500.0   # m
