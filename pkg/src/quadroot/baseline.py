"""Published benchmark values the harness is compared against.

TABLE1[problem][method] = (functional evaluations, COC)
TABLE2[problem] = successive M-8 step sizes |x_{n+1} - x_n|, printed with
two leading significant digits.
"""

from .solvers import MethodId as M

X0 = {"f1": "1.2", "f2": "-1.0", "f3": "1.5", "f4": "0.5", "f5": "1.3", "f6": "1.2"}

_COLUMNS = [M.HM, M.CM, M.LMM, M.NM, M.RWB, M.NETA, M.CH, M.WKL, M.M4, M.M8]

_ROWS = {
    "f1": [(27, 3), (27, 3), (24, 16), (20, 2), (20, 3), (20, 6), (20, 6), (20, 3), (18, 4), (16, 8)],
    "f2": [(24, 3), (24, 3), (24, 15.5), (22, 2), (20, 3), (20, 6), (20, 6), (20, 3), (18, 4), (16, 8)],
    "f3": [(21, 3), (21, 3), (18, 15.8), (20, 2), (20, 3), (20, 6), (20, 6), (20, 3), (18, 4), (16, 8)],
    "f4": [(21, 3), (21, 3), (24, 24), (18, 2), (20, 3), (16, 7), (16, 7), (20, 3), (18, 5), (16, 11)],
    "f5": [(24, 3), (24, 3), (24, 16), (20, 2), (20, 3), (20, 6), (20, 6), (20, 3), (18, 4), (16, 8)],
    "f6": [(24, 3), (27, 3), (24, 16), (26, 2), (20, 3), (20, 6), (20, 6), (20, 6), (21, 4), (20, 8)],
}

TABLE1 = {pid: dict(zip(_COLUMNS, row)) for pid, row in _ROWS.items()}

TABLE2 = {
    "f1": ["1.6e-1", "3.3e-9", "6.4e-71", "1.1e-564"],
    "f2": ["2.0e-1", "2.4e-6", "1.9e-45", "2.8e-358"],
    "f3": ["9.5e-2", "4.0e-10", "6.3e-77", "2.5e-611"],
    "f4": ["4.2e-1", "1.7e-5", "3.1e-55", "1.9e-601"],
    "f5": ["1.1e-1", "1.1e-8", "2.8e-65", "5.8e-518"],
    "f6": ["7.9e-1", "8.6e-4", "2.9e-25", "5.8e-197", "1.3e-1570"],
}

PLACEHOLDER = "***********"
