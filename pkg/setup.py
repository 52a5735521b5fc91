#!/usr/bin/env python
""" mdfocus detects a single changepoint online in multivariate exponential-family data.
It keeps only the changepoint candidates whose cumulative-sum points lie on the convex hull of
all such points, so exact likelihood-ratio statistics are computed in quasi-linear time.
- Exact, dyadic and projection-approximate engines
- Dense, ranked (sparse), thresholded and sum-of-max statistics
- Analytic and Monte-Carlo threshold calibration, delay bounds
- Brute-force and combinatorial oracles, simulation experiments
- Command line: detect, calibrate, oracle, experiment, edetect

"""

# Standard Library
import sys
from datetime import date

# Third Party
import setuptools

# First Party
import mdfocus

DOCLINES = (__doc__ or "").split("\n")
TESTS_PACKAGES = ["pytest", "hypothesis"]
INSTALL_REQUIRES = ["numpy", "scipy", "mpmath"]


def build_package(version):
    packages = setuptools.find_packages(include=["mdfocus", "mdfocus.*"])
    setuptools.setup(
        name="mdfocus",
        version=version,
        long_description="\n".join(DOCLINES[1:]),
        long_description_content_type="text/x-rst",
        description=DOCLINES[0],
        packages=packages,
        classifiers=[
            "Programming Language :: Python :: 3",
            "Programming Language :: Python :: 3.6",
            "Programming Language :: Python :: 3.7",
            "Programming Language :: Python :: 3.8",
            "Programming Language :: Python :: 3 :: Only",
            "License :: OSI Approved :: Apache Software License",
            "Operating System :: OS Independent",
        ],
        install_requires=INSTALL_REQUIRES,
        setup_requires=["pytest-runner"],
        tests_require=TESTS_PACKAGES,
        extras_require={"tests": TESTS_PACKAGES},
        entry_points={"console_scripts": ["mdfocus=mdfocus.cli:main"]},
        python_requires=">=3.6",
        license="Apache License Version 2.0",
    )


def detect_mdfocus_version():
    if "--release" in sys.argv:
        sys.argv.remove("--release")
        return mdfocus.__version__.strip()

    return mdfocus.__version__.strip() + "b" + str(date.today()).replace("-", "")


version = detect_mdfocus_version()
build_package(version=version)
