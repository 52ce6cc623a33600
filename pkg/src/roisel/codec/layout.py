"""Column indices of the per-CU field table and context index plan.

Coded fields come first; the trailing columns hold values the decoder
derives (actual luma mode, motion vector, reference) that neighbouring CUs
need for their own predictions.
"""

# coded
F_ROI = 0
F_PRED = 1      # 0 intra, 1 inter
F_MPMF = 2
F_MPMI = 3
F_REM = 4
F_CHROMA = 5
F_MERGEF = 6
F_MERGEI = 7
F_REF = 8
F_MVDX = 9
F_MVDY = 10
F_MVP = 11
F_DQP = 12
# derived
F_MODE = 13     # luma intra mode, -1 for inter CUs
F_MVX = 14
F_MVY = 15
F_REFI = 16     # reference actually used, -1 for intra
N_FIELDS = 17

# context ids
C_PRED = 0
C_MPMF = 1
C_MPMI = 2      # 2 bins
C_REM = 4       # 5 bins
C_CHROMA = 9    # 4 bins
C_MERGEF = 13
C_REF = 14
C_MVD_G0 = 15
C_MVD_G1 = 16
C_MVP = 17
C_DQP = 18      # 2
C_CBF = 20      # luma, chroma
C_LAST_X = 22   # 8
C_LAST_Y = 30   # 8
C_SIG = 38      # 6 luma + 6 chroma
C_GT1 = 50      # 4 luma + 4 chroma
C_GT2 = 58      # luma, chroma
N_CTX = 60

# every context starts equiprobable; adaptation does the rest
CTX_INIT = [154] * N_CTX

# kernel status codes
OK = 0
CORRUPT = 1
KS_OVERFLOW = 2
BUF_OVERFLOW = 3
