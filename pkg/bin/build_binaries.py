# Standard Library
import argparse
import os
import subprocess
import sys

parser = argparse.ArgumentParser(description="Build mdfocus wheels")
parser.add_argument(
    "--dist-dir",
    default="dist",
    dest="dist_dir",
    help="Directory the wheel is written to",
)
parser.add_argument(
    "--release",
    default=False,
    dest="release",
    action="store_true",
    help="Pass --release to build without the date suffix in the version",
)
args = parser.parse_args()
exec(open("mdfocus/_version.py").read())

VERSION = __version__

cmd = [sys.executable, "setup.py", "bdist_wheel", "--universal", "--dist-dir", args.dist_dir]
if args.release:
    cmd.insert(2, "--release")
subprocess.check_call(cmd)
print("Built mdfocus {} into {}".format(VERSION, os.path.abspath(args.dist_dir)))
subprocess.check_call(["rm", "-rf", "build", "mdfocus.egg-info", ".eggs"])
