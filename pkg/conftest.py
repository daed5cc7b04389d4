"""Pytest wiring: configure Django before the ekman test modules are collected."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'ekman_lab.settings')
django.setup()
