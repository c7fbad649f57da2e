#!/usr/bin/env python3
"""
Check an eisrank installation.

Verifies the dependencies, the optional curve dataset named by EISRANK_DATA, and a few
exact values that every later computation relies on.
"""
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Tuple

sys.path.append(str(Path(__file__).parent))

REQUIRED_PACKAGES = [
    "pydantic",
    "pydantic_settings",
    "dotenv",
    "sympy",
    "typer",
    "click",
    "rich",
]


def check_dependencies() -> Tuple[bool, List[str]]:
    """
    Check if required Python packages are installed.

    Returns:
        Tuple of (success, messages)
    """
    messages = []
    missing = []
    for package in REQUIRED_PACKAGES:
        try:
            __import__(package)
        except ImportError:
            missing.append(package)

    if missing:
        messages.append("✗ Missing required Python packages:")
        for pkg in missing:
            messages.append(f"   - {pkg}")
        messages.append("\nInstall them using: pip install -r requirements.txt")
        return False, messages
    messages.append("✓ All required Python packages are installed")
    return True, messages


def check_dataset() -> Tuple[bool, List[str]]:
    """
    Load the curve table, including the EISRANK_DATA file when it is set.

    Returns:
        Tuple of (success, messages)
    """
    from eisrank.core.exceptions import DatasetError
    from eisrank.db.curves import load_curves

    path = os.getenv("EISRANK_DATA")
    try:
        curves = load_curves(path)
    except DatasetError as e:
        return False, [f"✗ Curve dataset {path}: {str(e)}"]
    source = f"built-in table and {path}" if path else "built-in table"
    return True, [f"✓ Loaded {len(curves)} curves from the {source}"]


def check_arithmetic() -> Tuple[bool, List[str]]:
    """
    Recompute a handful of exact values.

    Returns:
        Tuple of (success, messages)
    """
    from eisrank.services.bernoulli import bernoulli
    from eisrank.services.quadfield import class_number_imag
    from eisrank.utils.numkernel import kronecker

    checks = [
        ("B_18 = 43867/798", bernoulli(18) == Fraction(43867, 798)),
        ("h(-23) = 3", class_number_imag(-23) == 3),
        ("kronecker(-8, 3) = 1", kronecker(-8, 3) == 1),
    ]
    messages = [f"{'✓' if ok else '✗'} {name}" for name, ok in checks]
    return all(ok for _, ok in checks), messages


def main() -> int:
    """Main entry point for the initialization script."""
    print("\n=== eisrank installation check ===\n")

    print("1. Checking dependencies...")
    deps_success, deps_messages = check_dependencies()
    for msg in deps_messages:
        print(f"   {msg}")
    if not deps_success:
        return 1

    print("\n2. Checking curve dataset...")
    data_success, data_messages = check_dataset()
    for msg in data_messages:
        print(f"   {msg}")

    print("\n3. Checking arithmetic...")
    math_success, math_messages = check_arithmetic()
    for msg in math_messages:
        print(f"   {msg}")

    print("\n=== Summary ===")
    print(f"Dependencies: {'✓' if deps_success else '✗'}")
    print(f"Dataset: {'✓' if data_success else '✗'}")
    print(f"Arithmetic: {'✓' if math_success else '✗'}")

    if data_success and math_success:
        print("\n✅ Installation looks good!")
        print("\nTo reproduce the worked examples, run:")
        print("   python start.py paper-examples")
        return 0
    print("\n❌ Check failed. Please look at the messages above.")
    return 1


if __name__ == "__main__":
    sys.exit(main())
