"""Моделирование спонтанного распада двухуровневого атома вблизи диспергирующих
и поглощающих диэлектрических тел.

Пакет вычисляет классические тензоры Грина, строит спектральное ядро памяти
и решает интегральное уравнение Вольтерры для амплитуды верхнего уровня.
"""

__version__ = "0.1.0"
