from setuptools import setup, find_packages

setup(
    name="deformation-cohomology",
    version="1.0.0",
    packages=find_packages(exclude=("tests",)),
    include_package_data=True,
    python_requires=">=3.10",
    install_requires=[
        "pydantic",
        "python-dotenv",
        "pydantic-settings",
        "loguru",
        "sympy",
    ],
    extras_require={
        "dev": [
            "pytest",
            "pytest-asyncio",
            "pytest-cov",
            "black",
            "flake8",
            "mypy",
            "isort",
        ],
    },
    entry_points={
        "console_scripts": [
            "defcoh = app.main:main",
        ],
    },
)
