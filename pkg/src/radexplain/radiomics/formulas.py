"""Human-readable formula for every feature, used by the feature dictionary.

Notation: x = in-mask intensities (N of them), q(g) = histogram of
discretized levels, p(i,j) = normalized symmetric co-occurrence matrix summed
over 4 directions, p_x/p_y its marginals, p_{x+y}/p_{x-y} its sum/difference
distributions. For the size-type matrices M(g,s) (runs, zones, dependence)
N_M = sum M, M_g = sum_s M(g,s), M_s = sum_g M(g,s), P = M / N_M.
Dependence size s = k + 1 for k dependent neighbours. log is base 2.
"""

_SIZE_COMMON = {
    "GrayLevelNonUniformity": "sum_g M_g^2 / N_M",
    "GrayLevelNonUniformityNormalized": "sum_g M_g^2 / N_M^2",
    "GrayLevelVariance": "sum P(g,s) (g - mu_g)^2, mu_g = sum P(g,s) g",
}


def _size_family(small, large, unit, entropy, variance, low, high):
    return {
        **_SIZE_COMMON,
        f"{small}Emphasis": "sum M(g,s) / s^2 / N_M",
        f"{large}Emphasis": "sum M(g,s) s^2 / N_M",
        f"{unit}NonUniformity": "sum_s M_s^2 / N_M",
        f"{unit}NonUniformityNormalized": "sum_s M_s^2 / N_M^2",
        variance: "sum P(g,s) (s - mu_s)^2, mu_s = sum P(g,s) s",
        entropy: "-sum P(g,s) log P(g,s)",
        f"{small}LowGrayLevelEmphasis": "sum M(g,s) / (s^2 g^2) / N_M",
        f"{small}HighGrayLevelEmphasis": "sum M(g,s) g^2 / s^2 / N_M",
        f"{large}LowGrayLevelEmphasis": "sum M(g,s) s^2 / g^2 / N_M",
        f"{large}HighGrayLevelEmphasis": "sum M(g,s) s^2 g^2 / N_M",
        low: "sum_g M_g / g^2 / N_M",
        high: "sum_g M_g g^2 / N_M",
    }


FORMULAS = {
    "shape2d": {
        "Elongation": "sqrt(lambda_minor / lambda_major) of pixel-centre covariance; 1 for one pixel",
        "MajorAxisLength": "4 sqrt(lambda_major)",
        "MaximumDiameter": "max distance between in-mask pixel centres",
        "MinorAxisLength": "4 sqrt(lambda_minor)",
        "Perimeter": "count of ROI/outside pixel edges x spacing",
        "PerimeterSurfaceRatio": "Perimeter / PixelSurface",
        "PixelSurface": "N x spacing^2",
        "Sphericity": "2 sqrt(pi PixelSurface) / Perimeter",
    },
    "firstorder": {
        "10Percentile": "10th percentile of x (linear interpolation)",
        "90Percentile": "90th percentile of x (linear interpolation)",
        "Energy": "sum x^2",
        "Entropy": "-sum q(g) log q(g)",
        "InterquartileRange": "P75(x) - P25(x)",
        "Kurtosis": "m4 / m2^2 (non-excess; 3 when m2 = 0)",
        "Maximum": "max x",
        "Mean": "sum x / N",
        "MeanAbsoluteDeviation": "sum |x - mean| / N",
        "Median": "median x",
        "Minimum": "min x",
        "Range": "max x - min x",
        "RobustMeanAbsoluteDeviation": "mean absolute deviation of x restricted to [P10, P90]",
        "RootMeanSquared": "sqrt(sum x^2 / N)",
        "Skewness": "m3 / m2^1.5 (0 when m2 = 0)",
        "TotalEnergy": "spacing^2 sum x^2",
        "Uniformity": "sum q(g)^2",
        "Variance": "m2 = sum (x - mean)^2 / N",
    },
    "glcm": {
        "Autocorrelation": "sum i j p(i,j)",
        "ClusterProminence": "sum (i + j - mu_x - mu_y)^4 p(i,j)",
        "ClusterShade": "sum (i + j - mu_x - mu_y)^3 p(i,j)",
        "ClusterTendency": "sum (i + j - mu_x - mu_y)^2 p(i,j)",
        "Contrast": "sum (i - j)^2 p(i,j)",
        "Correlation": "(sum i j p(i,j) - mu_x mu_y) / (sigma_x sigma_y); 1 when sigma_x sigma_y = 0",
        "DifferenceAverage": "sum k p_{x-y}(k)",
        "DifferenceEntropy": "-sum p_{x-y}(k) log p_{x-y}(k)",
        "DifferenceVariance": "sum (k - DifferenceAverage)^2 p_{x-y}(k)",
        "Idm": "sum p(i,j) / (1 + (i - j)^2)",
        "Idmn": "sum p(i,j) / (1 + (i - j)^2 / Ng^2)",
        "Idn": "sum p(i,j) / (1 + |i - j| / Ng)",
        "Imc1": "(HXY - HXY1) / max(HX, HY); 0 when both marginal entropies vanish",
        "InverseDifference": "sum p(i,j) / (1 + |i - j|)",
        "InverseVariance": "sum_{i != j} p(i,j) / (i - j)^2",
        "JointAverage": "mu_x = sum i p(i,j)",
        "JointEnergy": "sum p(i,j)^2",
        "JointEntropy": "-sum p(i,j) log p(i,j)",
        "MaximumProbability": "max p(i,j)",
        "SumAverage": "sum k p_{x+y}(k)",
        "SumEntropy": "-sum p_{x+y}(k) log p_{x+y}(k)",
        "SumSquares": "sum (i - mu_x)^2 p(i,j)",
    },
    "glrlm": {
        **_size_family("ShortRun", "LongRun", "RunLength", "RunEntropy", "RunVariance",
                       "LowGrayLevelRunEmphasis", "HighGrayLevelRunEmphasis"),
        "RunPercentage": "N_M / sum M(g,s) s  (runs per run-covered pixel, all directions)",
    },
    "glszm": {
        **_size_family("SmallArea", "LargeArea", "SizeZone", "ZoneEntropy", "ZoneVariance",
                       "LowGrayLevelZoneEmphasis", "HighGrayLevelZoneEmphasis"),
        "ZonePercentage": "N_M / N",
    },
    "gldm": _size_family("SmallDependence", "LargeDependence", "Dependence", "DependenceEntropy",
                         "DependenceVariance", "LowGrayLevelEmphasis", "HighGrayLevelEmphasis"),
    "ngtdm": {
        "Busyness": "sum p_i s_i / sum_{i,j} |i p_i - j p_j|",
        "Coarseness": "1 / sum p_i s_i, capped at 1e6",
        "Complexity": "sum_{i,j} |i - j| (p_i s_i + p_j s_j) / (p_i + p_j) / N_vp",
        "Contrast": "[sum_{i,j} p_i p_j (i - j)^2 / (N_gp (N_gp - 1))] [sum s_i / N_vp]",
        "Strength": "sum_{i,j} (p_i + p_j)(i - j)^2 / sum s_i",
    },
}
