from setuptools import setup, find_packages


setup(
    name='scdensity',
    version='0.1',
    author='author',
    author_email='author_email',
    packages=find_packages(exclude=('tests', 'tests.*')),
    include_package_data=True,
    package_data={'scdensity': ['config/*.yaml']},
    install_requires=[
        'click>=8.0,<8.3',
        'joblib>=1.0',
        'numpy>=1.20',
        'omegaconf>=2.0.5',
        'pandas>=1.3',
        'pyyaml>=5.1',
        'scipy>=1.7',
        'sympy>=1.8',
        'tqdm>=4.60',
    ],
    extras_require={'test': ['pytest>=7.0']},
    entry_points={
        'console_scripts': ['scdensity=scdensity.pipeline.run:main'],
    },
    license='LICENSE.txt',
)
