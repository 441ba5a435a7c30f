from setuptools import setup, find_packages

with open("README.md", "r") as fh:
    long_description = fh.read()

setup(
    name="guicorpus",
    version="0.1.0",
    author="guicorpus developers",
    description="GUI grounding and agent-step corpus toolkit",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    python_requires='>=3.8',
    install_requires=[
        'requests',
        'tqdm',
        'lm_dataformat',
        'joblib',
        'pandas',
        'numpy',
        'jsonlines'
    ],
    extras_require={
        'test': ['pytest', 'hypothesis', 'networkx']
    },
    package_data={
        'guicorpus': ['config.json', 'data/*.txt', 'data/*.json', 'data/*/*.json']
    },
    entry_points={
        'console_scripts': ['guicorpus = guicorpus.cli.cli:main']
    }
)
