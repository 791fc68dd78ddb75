from setuptools import setup, find_packages

setup(
    name="anomalous-decoherence",
    version="0.1.0",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.22.0",
        "pydantic>=2.0.0",
        "python-dotenv>=1.0.0",
        "pyyaml>=6.0.0",
        "scipy>=1.8.0",
        "typing-extensions>=4.0.0",
    ],
    extras_require={
        "dev": [
            "mypy>=1.0.0",
            "pytest>=7.0.0",
            "pytest-asyncio>=0.20.0",
        ]
    },
    entry_points={
        "console_scripts": [
            "anodec=cli.main:main",
        ],
    },
)
