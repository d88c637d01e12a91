from setuptools import setup, find_packages

setup(
    name="baltrunc",
    version="1.0.0",
    description="Balanced truncation model reduction for LTI state-space systems",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    author="Bouchene Med Mehdi",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.9",
    scripts=[
        "app.py"
    ],
    entry_points={
        "console_scripts": [
            "baltrunc=baltrunc.cli:main",
        ]
    },
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "matplotlib",
        "seaborn",
        "python-dotenv",
    ]
)
