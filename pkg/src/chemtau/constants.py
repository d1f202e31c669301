"""Physical constants and unit conversions (CGS-mol system)."""

R_U = 8.31446261815324e7  # erg / (mol K)
P_ATM = 1013250.0  # dyn / cm^2
CAL_TO_ERG = 4.184e7
AVOGADRO = 6.02214076e23
EV_TO_ERG = 1.602176634e-12

# standard atomic weights, g/mol
ATOMIC_WEIGHTS = {
    "H": 1.00794,
    "D": 2.014102,
    "HE": 4.002602,
    "LI": 6.941,
    "BE": 9.012182,
    "B": 10.811,
    "C": 12.0107,
    "N": 14.0067,
    "O": 15.9994,
    "F": 18.9984032,
    "NE": 20.1797,
    "NA": 22.98977,
    "MG": 24.305,
    "AL": 26.981538,
    "SI": 28.0855,
    "P": 30.973761,
    "S": 32.065,
    "CL": 35.453,
    "AR": 39.948,
    "K": 39.0983,
    "CA": 40.078,
    "TI": 47.867,
    "CR": 51.9961,
    "FE": 55.845,
    "NI": 58.6934,
    "CU": 63.546,
    "ZN": 65.409,
    "BR": 79.904,
    "KR": 83.798,
    "XE": 131.293,
    "E": 5.48579909e-4,
}
