import setuptools


scripts = ["bin/latent_witness.py"]

with open("README.md", "r") as fh:
    long_description = fh.read()

setuptools.setup(
    name="latent-witness-py",
    version="v0.1.0",
    include_package_data=True,
    description="Nonclassicality witnesses for latent representations.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["scripts"]),
    scripts=scripts,
    package_data={"": ["*.yaml", "*.csv"]},
    data_files=[("config", ["config/config.yaml", "config/schema.yaml", "config/directions.csv"])],
    install_requires=["numpy", "scipy", "pandas", "astropy", "yamale", "pyyaml"],
    extras_require={"test": ["pytest"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.8",
)
