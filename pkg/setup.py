from setuptools import setup, find_packages

setup(
    name="wavepacket-lab",
    version="0.1.0",
    description="Numerical laboratory for wave packet decompositions and refined Strichartz exponents of the parabola",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "matplotlib>=3.7.0",
        "pandas>=2.0.0",
        "fastapi>=0.100.0",
        "uvicorn>=0.23.0",
        "pydantic>=2.0.0",
        "pyyaml>=6.0",
        "python-dotenv>=1.0.0",
    ],
    entry_points={"console_scripts": ["wpl=lab_harness.cli:main"]},
    python_requires=">=3.9",
)
