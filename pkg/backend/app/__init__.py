"""linfeat command-line application"""
