from setuptools import setup, find_packages
from os import path

this_directory = path.abspath(path.dirname(__file__))
with open(path.join(this_directory, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

setup(
    name='llmTestGen',
    version='0.1',
    description='Unit test generation for Java by a chat model with compiler guided refinement',
    long_description=long_description,
    long_description_content_type="text/markdown",
    install_requires=[
        "sortedcontainers>=2.2.2",  # cassette entries, calendar of batch results
        "javalang>=0.13.0",  # Java parser for extraction, syntax checks and assertion counts
        "openai>=1.0",  # chat-completion endpoint
        "click>=8.0",  # command line interface
    ],
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Developers",
        "Intended Audience :: Science/Research",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3 :: Only",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Software Development :: Testing",
        "Topic :: Utilities"],
    packages=find_packages(exclude=["tests", "tests.*"]),
    package_data={"llmTestGen": ["prompts/templates/*/*.txt"]},
    entry_points={
        "console_scripts": ["llmtestgen=llmTestGen.cli:main"],
    },
    test_suite="tests.all.suite",
    zip_safe=False,
)
