"""Published destination-error counts per 250 m bin, with their printed percentages."""

NEW_JERSEY = [44, 18, 15, 12, 7, 14, 7, 14, 8, 10, 3, 4, 3, 95]
NEW_JERSEY_PERCENT = [17.32, 7.09, 5.91, 4.72, 2.76, 5.51, 2.76, 5.51, 3.15, 3.94, 1.18, 1.57, 1.18, 37.40]
SEATTLE = [107, 83, 82, 65, 43, 26, 31, 34, 17, 16, 26, 9, 10, 142]
SEATTLE_PERCENT = [15.48, 12.01, 11.87, 9.41, 6.22, 3.76, 4.49, 4.92, 2.46, 2.32, 3.76, 1.30, 1.45, 20.55]
# cumulative shares below 250, 500, 750, 1000 and 1250 m
NEW_JERSEY_CUMULATIVE = [17.32, 24.41, 30.31, 35.04, 37.80]
SEATTLE_CUMULATIVE = [15.48, 27.50, 39.36, 48.77, 54.99]
