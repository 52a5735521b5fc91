class InputError(ValueError):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


class RejectedObservation(InputError):
    def __init__(self, coord, value, reason):
        self.coord = coord
        self.value = value
        self.reason = reason
        super().__init__(
            "Observation {} rejected for coordinate {}: {}".format(value, coord, reason)
        )


class UndefinedSegment(InputError):
    def __init__(self, count):
        self.count = count
        super().__init__("Segment with {} observations has no maximized likelihood".format(count))


class ParameterDomainError(InputError):
    def __init__(self, family, eta):
        self.family = family
        self.eta = eta
        super().__init__("Natural parameter {} is outside the domain of {}".format(eta, family))


class MalformedRow(InputError):
    def __init__(self, line_number, message):
        self.line_number = line_number
        super().__init__("Malformed row at line {}: {}".format(line_number, message))


class ConfigError(ValueError):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


class InfiniteDelay(ArithmeticError):
    def __init__(self, delta_norm2):
        self.delta_norm2 = delta_norm2

    def __str__(self):
        return "Change of squared size {} is never detected: the delay bound is infinite".format(
            self.delta_norm2
        )


class InvariantViolation(RuntimeError):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


class WorkerFailure(RuntimeError):
    def __init__(self, scenario, replicate, message):
        self.scenario = scenario
        self.replicate = replicate
        self.message = message

    def __str__(self):
        return "Replicate {} of scenario {} failed: {}".format(
            self.replicate, self.scenario, self.message
        )


class DetectionConditionMet(Exception):
    def __init__(self, stat_name, n, tau_hat, value):
        self.stat_name = stat_name
        self.n = n
        self.tau_hat = tau_hat
        self.value = value

    def __str__(self):
        return "Statistic {} crossed its threshold at n={} with value {} (tau_hat={})".format(
            self.stat_name, self.n, self.value, self.tau_hat
        )
